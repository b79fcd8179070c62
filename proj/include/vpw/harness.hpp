#pragma once

#include "vpw/harness/parallel.hpp"
#include "vpw/harness/runner.hpp"
#include "vpw/harness/spec.hpp"
#include "vpw/harness/summarize.hpp"
#include "vpw/harness/sweep.hpp"
#include "vpw/harness/tune.hpp"
