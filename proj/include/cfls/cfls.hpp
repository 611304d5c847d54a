#pragma once

#include "cfls/csv.hpp"
#include "cfls/epistasis.hpp"
#include "cfls/errors.hpp"
#include "cfls/geninv.hpp"
#include "cfls/gram_lu.hpp"
#include "cfls/matrix.hpp"
#include "cfls/ols.hpp"
#include "cfls/oracle.hpp"
#include "cfls/parallel.hpp"
#include "cfls/sgso.hpp"
#include "cfls/weighted.hpp"
