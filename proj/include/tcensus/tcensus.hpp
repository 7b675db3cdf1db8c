#pragma once

#include "tcensus/block_selection.hpp"
#include "tcensus/bootstrap.hpp"
#include "tcensus/census.hpp"
#include "tcensus/dataset.hpp"
#include "tcensus/detector.hpp"
#include "tcensus/error.hpp"
#include "tcensus/evaluation.hpp"
#include "tcensus/fast_score.hpp"
#include "tcensus/features.hpp"
#include "tcensus/image.hpp"
#include "tcensus/integral.hpp"
#include "tcensus/io.hpp"
#include "tcensus/layout.hpp"
#include "tcensus/report.hpp"
#include "tcensus/sampling.hpp"
#include "tcensus/serialization.hpp"
#include "tcensus/svm.hpp"
