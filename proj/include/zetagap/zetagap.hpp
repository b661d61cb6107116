#ifndef ZETAGAP_ZETAGAP_HPP
#define ZETAGAP_ZETAGAP_HPP

#include "zetagap/chain_analysis.hpp"
#include "zetagap/errors.hpp"
#include "zetagap/experiment.hpp"
#include "zetagap/finite_chain.hpp"
#include "zetagap/gibbs.hpp"
#include "zetagap/indicator.hpp"
#include "zetagap/mixture.hpp"
#include "zetagap/model_diagnostics.hpp"
#include "zetagap/random_chains.hpp"
#include "zetagap/rng.hpp"
#include "zetagap/spike_slab.hpp"
#include "zetagap/text_io.hpp"

#endif
