// egotrack.hpp: umbrella header.

#pragma once

#include "egotrack/assignment.hpp"
#include "egotrack/clr.hpp"
#include "egotrack/eval.hpp"
#include "egotrack/features.hpp"
#include "egotrack/geometry.hpp"
#include "egotrack/ingest.hpp"
#include "egotrack/io.hpp"
#include "egotrack/kalman.hpp"
#include "egotrack/lstm.hpp"
#include "egotrack/svg.hpp"
#include "egotrack/tracker.hpp"
#include "egotrack/trackpost.hpp"
#include "egotrack/train.hpp"
