#pragma once

#include <mouldcalc/borel.hpp>
#include <mouldcalc/io.hpp>
#include <mouldcalc/moulds.hpp>
#include <mouldcalc/normalisation.hpp>
#include <mouldcalc/saddlenode.hpp>
#include <mouldcalc/scalar.hpp>
#include <mouldcalc/series.hpp>
#include <mouldcalc/verify.hpp>
#include <mouldcalc/words.hpp>
