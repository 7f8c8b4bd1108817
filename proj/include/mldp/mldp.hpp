#pragma once

#include "mldp/census.hpp"
#include "mldp/combinatorics.hpp"
#include "mldp/contraction.hpp"
#include "mldp/distribution.hpp"
#include "mldp/empirical.hpp"
#include "mldp/error.hpp"
#include "mldp/information.hpp"
#include "mldp/ldp.hpp"
#include "mldp/markov_model.hpp"
#include "mldp/numeric.hpp"
#include "mldp/sample_path.hpp"
#include "mldp/tuple_index.hpp"
#include "mldp/types_method.hpp"
