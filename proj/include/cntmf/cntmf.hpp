#pragma once

// Umbrella header.

#include "cntmf/catalog.hpp"    // IWYU pragma: export
#include "cntmf/dsl.hpp"        // IWYU pragma: export
#include "cntmf/feedback.hpp"   // IWYU pragma: export
#include "cntmf/mitigation.hpp" // IWYU pragma: export
#include "cntmf/model.hpp"      // IWYU pragma: export
#include "cntmf/report.hpp"     // IWYU pragma: export
#include "cntmf/risk.hpp"       // IWYU pragma: export
#include "cntmf/taxonomy.hpp"   // IWYU pragma: export
#include "cntmf/time.hpp"       // IWYU pragma: export
#include "cntmf/version.hpp"    // IWYU pragma: export
