#pragma once

#include "haargc/bounds.hpp"
#include "haargc/closed_form.hpp"
#include "haargc/dyadic.hpp"
#include "haargc/estimators.hpp"
#include "haargc/greedy.hpp"
#include "haargc/io.hpp"
#include "haargc/selftest.hpp"
