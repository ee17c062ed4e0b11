#pragma once

#include "revcast/error.hpp"
#include "revcast/random.hpp"
#include "revcast/parallel.hpp"
#include "revcast/csv.hpp"
#include "revcast/dlm/component.hpp"
#include "revcast/dlm/covariates.hpp"
#include "revcast/dlm/structure.hpp"
#include "revcast/dlm/posterior.hpp"
#include "revcast/dlm/filter.hpp"
#include "revcast/dlm/sampling.hpp"
#include "revcast/dlm/trajectory_io.hpp"
#include "revcast/data/panel.hpp"
#include "revcast/data/panel_io.hpp"
#include "revcast/data/calendar.hpp"
#include "revcast/data/preprocess.hpp"
#include "revcast/data/synthetic.hpp"
#include "revcast/multiscale/settings.hpp"
#include "revcast/multiscale/aggregate.hpp"
#include "revcast/multiscale/netprice.hpp"
#include "revcast/multiscale/pair_model.hpp"
#include "revcast/multiscale/study.hpp"
#include "revcast/multiscale/study_io.hpp"
#include "revcast/eval/point.hpp"
#include "revcast/eval/metrics.hpp"
#include "revcast/eval/compare.hpp"
#include "revcast/eval/crosscat.hpp"
#include "revcast/eval/io.hpp"
