#pragma once

#include "catalog.hpp"
#include "engine.hpp"
#include "exponent.hpp"
#include "fractal.hpp"
#include "matrix.hpp"
#include "norm.hpp"
#include "projective.hpp"
#include "scalar.hpp"
#include "spec.hpp"
#include "words.hpp"
#include "zeta.hpp"
