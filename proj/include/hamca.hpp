#pragma once

#include "hamca/automaton.hpp"
#include "hamca/cli.hpp"
#include "hamca/config.hpp"
#include "hamca/continuum.hpp"
#include "hamca/error.hpp"
#include "hamca/exactmath.hpp"
#include "hamca/integer.hpp"
#include "hamca/io.hpp"
#include "hamca/qmbridge.hpp"
#include "hamca/verify.hpp"
