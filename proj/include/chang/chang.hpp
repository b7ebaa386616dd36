#pragma once

// Umbrella header: the whole library.

#include "chang/chang_abelian.hpp"
#include "chang/chang_fpn.hpp"
#include "chang/cli.hpp"
#include "chang/common.hpp"
#include "chang/counting.hpp"
#include "chang/dense_map.hpp"
#include "chang/divergence.hpp"
#include "chang/fourier.hpp"
#include "chang/generators.hpp"
#include "chang/group.hpp"
#include "chang/oracle.hpp"
#include "chang/parallel.hpp"
#include "chang/rng.hpp"
#include "chang/serialization.hpp"
#include "chang/span_set.hpp"
#include "chang/subspace.hpp"
