#pragma once

#include "scengen/bundle.hpp"
#include "scengen/config.hpp"
#include "scengen/gaussianize.hpp"
#include "scengen/gemini.hpp"
#include "scengen/glasso.hpp"
#include "scengen/graph.hpp"
#include "scengen/ingest.hpp"
#include "scengen/pipeline.hpp"
#include "scengen/seasonal.hpp"
#include "scengen/simulate.hpp"
#include "scengen/tails.hpp"
