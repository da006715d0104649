// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "simplerc/codec.hpp"
#include "simplerc/error.hpp"
#include "simplerc/gf256.hpp"
#include "simplerc/layout.hpp"
#include "simplerc/mds.hpp"
#include "simplerc/metrics.hpp"
#include "simplerc/reliability.hpp"
#include "simplerc/repair.hpp"
#include "simplerc/scheme.hpp"
#include "simplerc/sim.hpp"
