#ifndef SARRT_SARRT_HPP
#define SARRT_SARRT_HPP

#include "constants.hpp"
#include "dag_sim.hpp"
#include "distributions.hpp"
#include "errors.hpp"
#include "law.hpp"
#include "law_spec.hpp"
#include "montecarlo.hpp"
#include "optimize.hpp"
#include "random_stream.hpp"
#include "rate_function.hpp"
#include "report.hpp"
#include "stats.hpp"
#include "tree_sim.hpp"

#endif
