#pragma once

#include "brieskorn/angles.hpp"
#include "brieskorn/cusp_census.hpp"
#include "brieskorn/levine_classifier.hpp"
#include "brieskorn/polar_mixed.hpp"
#include "brieskorn/render.hpp"
#include "brieskorn/roots.hpp"
#include "brieskorn/singular_locus.hpp"
