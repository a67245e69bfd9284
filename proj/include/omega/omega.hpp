#pragma once

#include "cache.hpp"
#include "charfunc.hpp"
#include "errors.hpp"
#include "fmodel.hpp"
#include "io.hpp"
#include "normality.hpp"
#include "parallel.hpp"
#include "rational.hpp"
#include "sieve.hpp"
#include "spacings.hpp"
#include "summation.hpp"
