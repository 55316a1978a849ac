#pragma once

#include "homomorphism.hpp"
#include "instance.hpp"
#include "pattern.hpp"
#include "query.hpp"
#include "rational.hpp"
#include "reduction.hpp"
#include "rewrite.hpp"
#include "tid.hpp"
