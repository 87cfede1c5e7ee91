#ifndef CPOFDM_CPOFDM_HPP
#define CPOFDM_CPOFDM_HPP

#include "cpofdm/channel.hpp"
#include "cpofdm/error.hpp"
#include "cpofdm/estimator.hpp"
#include "cpofdm/harness.hpp"
#include "cpofdm/iq_file.hpp"
#include "cpofdm/numerics.hpp"
#include "cpofdm/ofdm_tx.hpp"
#include "cpofdm/version.hpp"

#endif // CPOFDM_CPOFDM_HPP
