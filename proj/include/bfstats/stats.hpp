#pragma once

#include "bfstats/stats/acf.hpp"
#include "bfstats/stats/adf.hpp"
#include "bfstats/stats/common.hpp"
#include "bfstats/stats/describe.hpp"
#include "bfstats/stats/gengauss.hpp"
#include "bfstats/stats/hill.hpp"
#include "bfstats/stats/hurst.hpp"
#include "bfstats/stats/ks.hpp"
#include "bfstats/stats/kpss.hpp"
