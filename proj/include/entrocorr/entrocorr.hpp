#ifndef ENTROCORR_ENTROCORR_HPP
#define ENTROCORR_ENTROCORR_HPP

// Umbrella header: the whole library in one include.

#include "entrocorr/accum.hpp"
#include "entrocorr/continuum.hpp"
#include "entrocorr/dist.hpp"
#include "entrocorr/entropy.hpp"
#include "entrocorr/error.hpp"
#include "entrocorr/ingest.hpp"
#include "entrocorr/maxent.hpp"
#include "entrocorr/rng.hpp"
#include "entrocorr/version.hpp"

#endif  // ENTROCORR_ENTROCORR_HPP
