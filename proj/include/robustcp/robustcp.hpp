#pragma once

#include "robustcp/error.hpp"
#include "robustcp/estimators.hpp"
#include "robustcp/order_statistics.hpp"
#include "robustcp/css.hpp"
#include "robustcp/detect.hpp"
#include "robustcp/random.hpp"
#include "robustcp/simulate.hpp"
#include "robustcp/bench.hpp"
#include "robustcp/presets.hpp"
#include "robustcp/series_io.hpp"
#include "robustcp/report.hpp"
