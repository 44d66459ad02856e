#pragma once

#include "folia/errors.hpp"
#include "folia/scalar.hpp"
#include "folia/exactla.hpp"
#include "folia/poly.hpp"
#include "folia/index_set.hpp"
#include "folia/multivec.hpp"
#include "folia/forms.hpp"
#include "folia/logfol.hpp"
#include "folia/tangent.hpp"
#include "folia/json_io.hpp"
