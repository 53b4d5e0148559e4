#pragma once
// Umbrella header for the prefsearch library.

#include "prefsearch/catalog.hpp"
#include "prefsearch/engine.hpp"
#include "prefsearch/error.hpp"
#include "prefsearch/facetbase.hpp"
#include "prefsearch/generator.hpp"
#include "prefsearch/interaction.hpp"
#include "prefsearch/metrics.hpp"
#include "prefsearch/relevance.hpp"
#include "prefsearch/report.hpp"
#include "prefsearch/scoring.hpp"
#include "prefsearch/service.hpp"
#include "prefsearch/session.hpp"
