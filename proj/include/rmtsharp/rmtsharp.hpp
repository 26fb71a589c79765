#pragma once
// Convenience umbrella: pulls in the whole library.

#include "rmtsharp/errors.hpp"
#include "rmtsharp/exact.hpp"
#include "rmtsharp/experiments.hpp"
#include "rmtsharp/io.hpp"
#include "rmtsharp/matrix.hpp"
#include "rmtsharp/models.hpp"
#include "rmtsharp/rng.hpp"
#include "rmtsharp/spectral.hpp"
#include "rmtsharp/structure.hpp"
#include "rmtsharp/vectors.hpp"
