#pragma once

// Umbrella header for the whole library.

#include "mwzeta/error.hpp"
#include "mwzeta/padic.hpp"
#include "mwzeta/rational.hpp"
#include "mwzeta/finite_field.hpp"
#include "mwzeta/dagger_series.hpp"
#include "mwzeta/padic_poly.hpp"
#include "mwzeta/dagger_algebra.hpp"
#include "mwzeta/linalg.hpp"
#include "mwzeta/frobenius.hpp"
#include "mwzeta/mw_engine.hpp"
#include "mwzeta/nuclear.hpp"
#include "mwzeta/cech.hpp"
#include "mwzeta/spec_file.hpp"
#include "mwzeta/pipeline.hpp"
#include "mwzeta/checks.hpp"
