#pragma once

#include "sindy/csv.hpp"
#include "sindy/dense.hpp"
#include "sindy/dictionary.hpp"
#include "sindy/dynamics.hpp"
#include "sindy/errors.hpp"
#include "sindy/identify.hpp"
#include "sindy/linalg.hpp"
#include "sindy/random.hpp"
#include "sindy/reference_cases.hpp"
#include "sindy/solver.hpp"
