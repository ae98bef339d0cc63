#ifndef STELLAR_STELLAR_HPP
#define STELLAR_STELLAR_HPP

#include "stellar/errors.hpp"
#include "stellar/ladder.hpp"
#include "stellar/state.hpp"
#include "stellar/polynomial.hpp"
#include "stellar/hermite.hpp"
#include "stellar/contour.hpp"
#include "stellar/wavefunction.hpp"
#include "stellar/assignment.hpp"
#include "stellar/ode.hpp"
#include "stellar/dynamics.hpp"
#include "stellar/phase.hpp"
#include "stellar/oracle.hpp"

#endif // STELLAR_STELLAR_HPP
