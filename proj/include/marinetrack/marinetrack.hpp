#pragma once

#include "marinetrack/geodesy.hpp"
#include "marinetrack/projection.hpp"
#include "marinetrack/assignment.hpp"
#include "marinetrack/tracker.hpp"
#include "marinetrack/alignment.hpp"
#include "marinetrack/fusion.hpp"
#include "marinetrack/kdtree.hpp"
#include "marinetrack/evaluation.hpp"
#include "marinetrack/random.hpp"
#include "marinetrack/simulator.hpp"
#include "marinetrack/pipeline.hpp"
#include "marinetrack/config.hpp"
#include "marinetrack/io.hpp"
#include "marinetrack/experiments.hpp"
