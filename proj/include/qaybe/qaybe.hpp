// qaybe.hpp: everything.

#pragma once

#include "qaybe/dense.hpp"
#include "qaybe/errors.hpp"
#include "qaybe/families.hpp"
#include "qaybe/graded_op.hpp"
#include "qaybe/identities.hpp"
#include "qaybe/kernels.hpp"
#include "qaybe/operators.hpp"
#include "qaybe/report.hpp"
#include "qaybe/runner.hpp"
#include "qaybe/sampling.hpp"
#include "qaybe/superspace.hpp"
