#pragma once

#include "expkin/collision.hpp"
#include "expkin/error.hpp"
#include "expkin/euler_ref.hpp"
#include "expkin/harness/convergence.hpp"
#include "expkin/harness/scenario.hpp"
#include "expkin/integrators.hpp"
#include "expkin/macro_euler.hpp"
#include "expkin/phase_space.hpp"
#include "expkin/tableaus.hpp"
#include "expkin/transport.hpp"
