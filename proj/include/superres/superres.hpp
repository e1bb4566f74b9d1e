#pragma once

#include "errors.hpp"
#include "random.hpp"
#include "geometry.hpp"
#include "model.hpp"
#include "spectral.hpp"
#include "detection.hpp"
#include "pencil.hpp"
#include "recovery.hpp"
#include "harness.hpp"
#include "io.hpp"
