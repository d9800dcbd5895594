#pragma once

#include "pnml/core.hpp"
#include "pnml/harness.hpp"
#include "pnml/io.hpp"
#include "pnml/models.hpp"
#include "pnml/pnml.hpp"
#include "pnml/sequence.hpp"
#include "pnml/stochastic.hpp"
#include "pnml/twice_universal.hpp"
#include "pnml/version.hpp"
