#pragma once

#include "retroplan/env.hpp"         // IWYU pragma: export
#include "retroplan/features.hpp"    // IWYU pragma: export
#include "retroplan/harness.hpp"     // IWYU pragma: export
#include "retroplan/memory.hpp"      // IWYU pragma: export
#include "retroplan/models.hpp"      // IWYU pragma: export
#include "retroplan/oracle.hpp"      // IWYU pragma: export
#include "retroplan/pretrain.hpp"    // IWYU pragma: export
#include "retroplan/reflection.hpp"  // IWYU pragma: export
#include "retroplan/rng.hpp"         // IWYU pragma: export
#include "retroplan/taskgen.hpp"     // IWYU pragma: export
#include "retroplan/trace.hpp"       // IWYU pragma: export
#include "retroplan/types.hpp"       // IWYU pragma: export
#include "retroplan/version.hpp"     // IWYU pragma: export
