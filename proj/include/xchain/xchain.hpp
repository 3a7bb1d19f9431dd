#pragma once

#include "adapter.hpp"
#include "bridge.hpp"
#include "chain.hpp"
#include "comm.hpp"
#include "executor.hpp"
#include "ids.hpp"
#include "methods.hpp"
#include "protocol.hpp"
#include "rng.hpp"
#include "scenario.hpp"
#include "sim.hpp"
#include "trace.hpp"
#include "txn.hpp"
#include "value.hpp"
#include "verify.hpp"
#include "world.hpp"
