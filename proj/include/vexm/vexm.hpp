#pragma once

#include "vexm/admissibility.hpp"
#include "vexm/case_file.hpp"
#include "vexm/domain.hpp"
#include "vexm/errors.hpp"
#include "vexm/exponent.hpp"
#include "vexm/family.hpp"
#include "vexm/grid.hpp"
#include "vexm/harness.hpp"
#include "vexm/lemmas.hpp"
#include "vexm/norms.hpp"
#include "vexm/operators.hpp"
#include "vexm/parallel.hpp"
#include "vexm/report.hpp"
#include "vexm/root_finding.hpp"
