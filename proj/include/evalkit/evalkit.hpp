#pragma once

#include "evalkit/arch.hpp"
#include "evalkit/error.hpp"
#include "evalkit/eval.hpp"
#include "evalkit/grid.hpp"
#include "evalkit/ingest.hpp"
#include "evalkit/models.hpp"
#include "evalkit/normalize.hpp"
#include "evalkit/report.hpp"
#include "evalkit/rsqasm.hpp"
