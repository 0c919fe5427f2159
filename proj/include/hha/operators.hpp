#pragma once
// Maximal operators, kernels, convolution, potentials and the grand maximal function.

#include "hha/convolution.hpp"
#include "hha/grand_maximal.hpp"
#include "hha/kernel.hpp"
#include "hha/maximal.hpp"
#include "hha/potential.hpp"
