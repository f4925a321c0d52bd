#pragma once

#include "rbf_formation/controllers.hpp"
#include "rbf_formation/dynamics.hpp"
#include "rbf_formation/error.hpp"
#include "rbf_formation/export.hpp"
#include "rbf_formation/formation.hpp"
#include "rbf_formation/metrics.hpp"
#include "rbf_formation/rbf_estimator.hpp"
#include "rbf_formation/scenario.hpp"
#include "rbf_formation/simulation.hpp"
#include "rbf_formation/wind.hpp"
