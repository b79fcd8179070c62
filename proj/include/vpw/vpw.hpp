#pragma once

#include "vpw/action_space.hpp"
#include "vpw/belief.hpp"
#include "vpw/cem.hpp"
#include "vpw/errors.hpp"
#include "vpw/mcts.hpp"
#include "vpw/problem.hpp"
#include "vpw/rng.hpp"
#include "vpw/sparse.hpp"
#include "vpw/voo.hpp"
#include "vpw/widening.hpp"
