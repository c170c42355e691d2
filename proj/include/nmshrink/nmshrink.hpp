#pragma once

#include "nmshrink/audit.hpp"
#include "nmshrink/error.hpp"
#include "nmshrink/estimators.hpp"
#include "nmshrink/gibbs.hpp"
#include "nmshrink/kernel.hpp"
#include "nmshrink/model.hpp"
#include "nmshrink/quadrature.hpp"
#include "nmshrink/random.hpp"
#include "nmshrink/risk.hpp"
#include "nmshrink/special.hpp"
#include "nmshrink/version.hpp"
