#ifndef PHILAP_PHILAP_HPP
#define PHILAP_PHILAP_HPP

#include "philap/core.hpp"
#include "philap/nfunction.hpp"
#include "philap/nonlinearity.hpp"
#include "philap/grid.hpp"
#include "philap/energy.hpp"
#include "philap/radial.hpp"
#include "philap/verifier.hpp"

#endif  // PHILAP_PHILAP_HPP
