#pragma once

#include "cradon/abel.hpp"
#include "cradon/cancel.hpp"
#include "cradon/errors.hpp"
#include "cradon/fields.hpp"
#include "cradon/geometry.hpp"
#include "cradon/interp.hpp"
#include "cradon/quadrature.hpp"
#include "cradon/radon.hpp"
#include "cradon/spectral.hpp"
#include "cradon/vec2.hpp"
#include "cradon/wave.hpp"
