#pragma once

#include "ioaware/autotune.hpp"
#include "ioaware/constraint.hpp"
#include "ioaware/device.hpp"
#include "ioaware/error.hpp"
#include "ioaware/generators.hpp"
#include "ioaware/graph.hpp"
#include "ioaware/report.hpp"
#include "ioaware/resources.hpp"
#include "ioaware/scheduler.hpp"
#include "ioaware/sim.hpp"
#include "ioaware/threads.hpp"
#include "ioaware/trace.hpp"
#include "ioaware/workload.hpp"
