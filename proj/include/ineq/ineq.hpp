#pragma once

// Umbrella header: sharp bounds for inequality indices from coarsened data,
// with resampling inference, imputation baselines, brute-force verification,
// and file ingestion/emission.

#include "common.hpp"
#include "data.hpp"
#include "indices.hpp"
#include "imputation.hpp"
#include "simplex.hpp"
#include "lfp.hpp"
#include "scenario1.hpp"
#include "scenario2.hpp"
#include "oracle.hpp"
#include "bootstrap.hpp"
#include "io.hpp"
