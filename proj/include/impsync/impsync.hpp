#pragma once

// Convenience umbrella: the whole library in one include.

#include "impsync/errors.hpp"
#include "impsync/mat.hpp"
#include "impsync/solve.hpp"
#include "impsync/qr.hpp"
#include "impsync/expm.hpp"
#include "impsync/eig.hpp"
#include "impsync/deadbeat.hpp"
#include "impsync/graph.hpp"
#include "impsync/sync.hpp"
#include "impsync/runspec.hpp"
#include "impsync/io.hpp"
