#pragma once

#include "tomoq/version.hpp"
#include "tomoq/rng.hpp"
#include "tomoq/prob.hpp"
#include "tomoq/report.hpp"
#include "tomoq/reshape.hpp"
#include "tomoq/matrix.hpp"
#include "tomoq/quantum.hpp"
#include "tomoq/inequalities.hpp"
#include "tomoq/sweep.hpp"
#include "tomoq/io.hpp"
