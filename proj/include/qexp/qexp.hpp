#pragma once

#include "qexp/error.hpp"
#include "qexp/matrix.hpp"
#include "qexp/rng.hpp"
#include "qexp/haar.hpp"
#include "qexp/channel.hpp"
#include "qexp/channel_io.hpp"
#include "qexp/spectrum.hpp"
#include "qexp/cayley.hpp"
#include "qexp/edgex.hpp"
#include "qexp/experiment.hpp"
#include "qexp/sd/rational.hpp"
#include "qexp/sd/word.hpp"
#include "qexp/sd/parse.hpp"
#include "qexp/sd/step.hpp"
#include "qexp/sd/series.hpp"
#include "qexp/sd/exact.hpp"
#include "qexp/sd/montecarlo.hpp"
