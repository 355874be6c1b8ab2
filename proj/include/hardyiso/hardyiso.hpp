#pragma once

#include "blaschke.hpp"
#include "errors.hpp"
#include "hardy.hpp"
#include "io.hpp"
#include "isometry.hpp"
#include "moebius.hpp"
#include "numeric.hpp"
