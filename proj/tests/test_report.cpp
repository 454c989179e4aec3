#include <gtest/gtest.h>

#include <filesystem>

#include "primelike/report.hpp"

using namespace primelike;

namespace {

Json test_header() { return make_header(Json{{"command", "check"}, {"workers", 1}}); }

std::string temp_path(const char* name) { return (std::filesystem::temp_directory_path() / name).string(); }

}  // namespace

TEST(CheckJson, FieldOrderAndNames) {
    const auto s = NumberSet::from_sorted({2}, 10);
    const auto r = check_range(s, 4, 8, {}, SetSpec::primes(10));
    const Json j = check_report_json(r, test_header());
    std::vector<std::string> keys;
    for (const auto& [k, v] : j.items()) keys.push_back(k);
    EXPECT_EQ(keys, (std::vector<std::string>{"header", "schema_version", "spec", "lo", "hi", "failures",
                                              "threshold_N0", "buckets", "wall_ms"}));
    EXPECT_EQ(j["failures"], Json::array({6, 8}));
    EXPECT_EQ(j["threshold_N0"], 8);
    EXPECT_EQ(j["spec"]["kind"], "primes");
    EXPECT_EQ(j["schema_version"], 1);
    ASSERT_EQ(j["buckets"].size(), 1u);
    std::vector<std::string> bkeys;
    for (const auto& [k, v] : j["buckets"][0].items()) bkeys.push_back(k);
    EXPECT_EQ(bkeys, (std::vector<std::string>{"lo", "hi", "sampled", "min_reps", "mean_reps"}));
}

TEST(CheckJson, ParseReserializeIsByteIdentical) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto q = perturb_primes(1500000, seed);
        CheckOptions o;
        o.sample_every = 97;
        const auto r = check_range(q, 4, 2400000, o, SetSpec::perturbed(1500000, seed));
        const std::string text = serialize_check_json(r, test_header());
        const auto parsed = parse_check_json(text);
        EXPECT_EQ(serialize_check_json(parsed.report, parsed.header), text);
        EXPECT_EQ(parsed.report.failures, r.failures);
        EXPECT_EQ(parsed.report.spec, r.spec);
    }
}

TEST(CheckJson, BodyIgnoresHeaderAndWallTime) {
    const auto p = primes_up_to(20000);
    auto r1 = check_range(p, 4, 20000);
    auto r2 = r1;
    r2.wall_ms = r1.wall_ms + 1234;
    const auto h2 = make_header(Json{{"command", "check"}, {"workers", 8}});
    EXPECT_EQ(check_report_body(serialize_check_json(r1, test_header())),
              check_report_body(serialize_check_json(r2, h2)));
    r2.failures.push_back(20000);
    EXPECT_NE(check_report_body(serialize_check_json(r1, test_header())),
              check_report_body(serialize_check_json(r2, h2)));
}

TEST(CheckJson, ParseErrors) {
    EXPECT_THROW(parse_check_json("{not json"), InputError);
    EXPECT_THROW(parse_check_json("{\"schema_version\": 1}"), InputError);
    EXPECT_THROW(parse_check_json("{\"schema_version\": 2}"), InputError);
}

TEST(CheckCsv, OneBucketPerRow) {
    const auto p = primes_up_to(1500000);
    const auto r = check_range(p, 4, 2000000, {}, SetSpec::primes(1500000));
    const std::string csv = serialize_check_csv(r, test_header());
    EXPECT_NE(csv.find("# failures=\n"), std::string::npos);
    EXPECT_NE(csv.find("lo,hi,sampled,min_reps,mean_reps\n4,999998,500,"), std::string::npos);
    EXPECT_NE(csv.find("\n2000000,2000000,1,"), std::string::npos);
    const auto pts = plot_points_from_check_csv(csv);
    EXPECT_EQ(pts.size(), 2 * r.buckets.size());
}

TEST(ModelTable, ColumnsAndMonotoneSeries) {
    std::vector<ModelRow> rows;
    for (Natural n = 1000; n <= 100000; n += 1000) rows.push_back(model_row(n));
    const std::string csv = model_table_csv(rows);
    EXPECT_TRUE(csv.starts_with("n,k,domain_size,damping_c,ln_P_exact,log10_f,log10_tail\n"));
    const auto back = parse_model_table_csv(csv);
    ASSERT_EQ(back.size(), 100u);
    for (std::size_t i = 1; i < back.size(); ++i) EXPECT_LT(back[i].log10_f, back[i - 1].log10_f);

    const auto pts = plot_points(back);
    std::size_t f_rows = 0;
    for (const auto& p : pts) f_rows += p.series == "log10_f";
    EXPECT_EQ(f_rows, 100u);
}

TEST(ModelTable, InfinityAndNaNAreWritten) {
    ModelRow r;
    r.params = {12, 5, 5, 4, 3.0};
    r.ln_P_exact = -std::numeric_limits<double>::infinity();
    r.log10_f = -1.5;
    const std::string csv = model_table_csv({r});
    EXPECT_NE(csv.find("12,5,4,3,-inf,-1.5,nan\n"), std::string::npos);
    const auto back = parse_model_table_csv(csv);
    EXPECT_TRUE(std::isinf(back[0].ln_P_exact));
    EXPECT_TRUE(std::isnan(back[0].log10_tail));
}

TEST(PlotData, EmptyFailuresGiveValidFile) {
    const auto p = primes_up_to(10000);
    const auto r = check_range(p, 4, 10000, {}, SetSpec::primes(10000));
    const auto in = temp_path("primelike_plot_in.json");
    const auto out = temp_path("primelike_plot_out.csv");
    write_text_file(in, serialize_check_json(r, test_header()));
    emit_plot_data(in, out);
    const std::string csv = read_text_file(out);
    EXPECT_TRUE(csv.starts_with("series,x,y\n"));
    EXPECT_EQ(csv.find("failure,"), std::string::npos);
    EXPECT_NE(csv.find("min_reps,4,"), std::string::npos);
    std::filesystem::remove(in);
    std::filesystem::remove(out);
}

TEST(PlotData, PerturbedDeviationSeriesAtMostTwo) {
    const auto q = perturb_primes(100000, 42);
    const std::string csv = plot_data_for(write_set_text(q, {" perturbed"}));
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "series,x,y");
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ASSERT_TRUE(line.starts_with("deviation,"));
        const double y = std::stod(line.substr(line.rfind(',') + 1));
        ASSERT_LE(y, 2.0);
        ++rows;
    }
    EXPECT_EQ(rows, 100001u);  // step 1 up to limit 100001
}

TEST(PlotData, UnwritablePath) {
    EXPECT_THROW(write_text_file("/nonexistent-dir/x.csv", "a"), InputError);
}
