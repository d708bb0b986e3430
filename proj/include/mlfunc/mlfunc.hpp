#pragma once

#include "mlfunc/bounds.hpp"
#include "mlfunc/compensated.hpp"
#include "mlfunc/complex.hpp"
#include "mlfunc/contour.hpp"
#include "mlfunc/errors.hpp"
#include "mlfunc/eval.hpp"
#include "mlfunc/gamma.hpp"
#include "mlfunc/matrix.hpp"
#include "mlfunc/quadrature.hpp"
#include "mlfunc/selftest.hpp"
#include "mlfunc/series.hpp"
