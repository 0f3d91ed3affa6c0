#pragma once

// Umbrella header. report_io.hpp is left out so that users who do not need
// JSON output do not pull in the json header.

#include "pmc/bundle.hpp"
#include "pmc/catalog.hpp"
#include "pmc/chart_file.hpp"
#include "pmc/connections.hpp"
#include "pmc/conventions.hpp"
#include "pmc/divergence.hpp"
#include "pmc/error.hpp"
#include "pmc/expr.hpp"
#include "pmc/fields.hpp"
#include "pmc/forms.hpp"
#include "pmc/jet.hpp"
#include "pmc/killing.hpp"
#include "pmc/metacurvature.hpp"
#include "pmc/report.hpp"
