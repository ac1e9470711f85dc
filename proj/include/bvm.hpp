// Umbrella header.

#ifndef BVM_HPP_
#define BVM_HPP_

#include "bvm/density.hpp"
#include "bvm/errors.hpp"
#include "bvm/estimators.hpp"
#include "bvm/fisher_mml.hpp"
#include "bvm/kl.hpp"
#include "bvm/mixture.hpp"
#include "bvm/norm_constant.hpp"
#include "bvm/optimize.hpp"
#include "bvm/params.hpp"
#include "bvm/sampler.hpp"
#include "bvm/special_fn.hpp"
#include "bvm/stats.hpp"
#include "bvm/torus.hpp"

#endif  // BVM_HPP_
