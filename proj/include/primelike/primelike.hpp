#pragma once

#include "primelike/checker.hpp"
#include "primelike/error.hpp"
#include "primelike/numset.hpp"
#include "primelike/probmodel.hpp"
#include "primelike/report.hpp"
#include "primelike/setio.hpp"
#include "primelike/simsets.hpp"
#include "primelike/version.hpp"
