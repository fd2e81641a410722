use std::ops::RangeInclusive;

use crate::catalog::{Catalog, CourseFlag, GroupKind, GroupMode, Level, Transcript};
use crate::error::BuildError;
use crate::milp::{MilpModel, Sense, VarId};
use crate::model::{BuildOptions, Family, GradeEstimates, Preferences, VarMap, VarRef};
use crate::prereq::dnf_to_cnf;
use crate::term::{k_of, TermIndex};

pub(super) struct Builder<'a> {
    catalog: &'a Catalog,
    transcript: &'a Transcript,
    prefs: &'a Preferences,
    options: &'a BuildOptions,
    model: MilpModel,
    vars: VarMap,
    /// `open[i][s]`: whether `x_{i,s}` may still be 1 after bound fixing.
    open: Vec<Vec<bool>>,
    grades: Vec<f64>,
}

impl<'a> Builder<'a> {
    pub(super) fn new(
        catalog: &'a Catalog,
        transcript: &'a Transcript,
        prefs: &'a Preferences,
        estimates: &GradeEstimates,
        options: &'a BuildOptions,
    ) -> Result<Builder<'a>, BuildError> {
        let cal = catalog.calendar();
        let n = catalog.len();
        let s_max = cal.s_max;
        if prefs.thesis_max.is_some() && catalog.with_flag(CourseFlag::Thesis).is_empty() {
            return Err(BuildError::Config("a thesis limit was given but no course is flagged as thesis".into()));
        }

        let mut model = MilpModel::new();
        let mut reverse = Vec::with_capacity(n * (s_max as usize + 2) + 3);
        let mut taken = Vec::with_capacity(n);
        for (i, c) in catalog.courses().iter().enumerate() {
            taken.push(model.add_binary(format!("x_{}", c.code))?);
            reverse.push(VarRef::Taken(i));
        }
        let mut taken_in = Vec::with_capacity(n);
        for (i, c) in catalog.courses().iter().enumerate() {
            let mut row = Vec::with_capacity(s_max as usize + 1);
            for s in 0..=s_max {
                row.push(model.add_binary(format!("x_{}_{}", c.code, s))?);
                reverse.push(VarRef::TakenIn(i, s));
            }
            taken_in.push(row);
        }

        let mut grades = vec![0.0; n];
        let mut eligible = Vec::new();
        for (code, g) in estimates.eligible() {
            if let Some(i) = catalog.index_of(code) {
                if !transcript.passed(&catalog.courses()[i].code) && grades[i] == 0.0 {
                    grades[i] = g.value();
                    eligible.push(i);
                }
            }
        }
        eligible.sort_unstable();
        let earned = transcript.earned_credits(catalog);
        let credits_remaining = estimates
            .credits_remaining
            .unwrap_or_else(|| cal.total_credits.saturating_sub(earned));

        let difficulty_total: f64 = catalog.courses().iter().map(|c| c.difficulty).sum();
        let grade_total: f64 = eligible.iter().map(|&i| grades[i]).sum();
        let completion = model.add_continuous("D", 0.0, f64::from(s_max))?;
        let balance = model.add_continuous("D_L", 0.0, difficulty_total)?;
        let grade_mass = model.add_continuous("G_e", 0.0, grade_total)?;
        reverse.extend([VarRef::Completion, VarRef::Balance, VarRef::GradeMass]);

        let vars = VarMap {
            taken,
            taken_in,
            completion,
            balance,
            grade_mass,
            s_max,
            current: transcript.current_term(),
            credit_cap: cal.credit_cap(prefs.honors),
            eligible,
            credits_remaining,
            reverse,
        };
        Ok(Builder {
            catalog,
            transcript,
            prefs,
            options,
            model,
            vars,
            open: vec![vec![true; s_max as usize + 1]; n],
            grades,
        })
    }

    pub(super) fn build(mut self) -> Result<(MilpModel, VarMap), BuildError> {
        self.fix_bounds()?;
        self.check_selections()?;
        self.emit_requisites()?;
        self.emit_levels()?;
        self.emit_availability_linking()?;
        self.emit_credits_groups()?;
        self.emit_selections()?;
        self.emit_softorder()?;
        self.emit_caps()?;
        self.emit_objective()?;
        Ok((self.model, self.vars))
    }

    fn on(&self, family: Family) -> bool {
        self.options.enabled(family)
    }

    fn s_n(&self) -> u32 {
        self.vars.current.get()
    }

    /// Terms still open for planning, `s_n..=S_max`.
    fn planning_terms(&self) -> RangeInclusive<u32> {
        self.s_n()..=self.vars.s_max
    }

    fn x(&self, i: usize) -> VarId {
        self.vars.taken(i)
    }

    fn xs(&self, i: usize, s: u32) -> VarId {
        self.vars.taken_in(i, s)
    }

    fn code(&self, i: usize) -> &'a str {
        &self.catalog.courses()[i].code
    }

    fn idx(&self, code: &str) -> usize {
        self.catalog.index_of(code).expect("resolved code")
    }

    fn close(&mut self, i: usize, s: u32) -> Result<(), BuildError> {
        self.open[i][s as usize] = false;
        self.model.fix(self.xs(i, s), 0.0)?;
        Ok(())
    }

    fn fix_bounds(&mut self) -> Result<(), BuildError> {
        let cat = self.catalog;
        let s_max = self.vars.s_max;
        let s_n = self.s_n();
        for (i, course) in cat.courses().iter().enumerate() {
            if self.transcript.passed(&course.code) {
                self.model.fix(self.xs(i, 0), 1.0)?;
                for s in 1..=s_max {
                    self.close(i, s)?;
                }
                continue;
            }
            self.close(i, 0)?;
            let blocked = (course.has(CourseFlag::Honors) && !self.prefs.honors) || self.prefs.rejected.contains(&course.code);
            if blocked {
                self.model.fix(self.x(i), 0.0)?;
            }
            let window = self.prefs.windows.get(&course.code).filter(|_| self.on(Family::Pins));
            for s in 1..=s_max {
                let t = TermIndex::new(s).expect("s >= 1");
                let shut = blocked
                    || s < s_n
                    || (self.on(Family::Offering) && !course.is_offered(t))
                    || (self.on(Family::SummersOff) && self.prefs.summers_off && t.season().is_summer())
                    || window.is_some_and(|w| !w.contains(&t));
                if shut {
                    self.close(i, s)?;
                }
            }
        }
        Ok(())
    }

    /// Why `x_{i,s}` is fixed to 0, as a tag.
    fn closed_reason(&self, i: usize, s: u32) -> String {
        let course = &self.catalog.courses()[i];
        let code = &course.code;
        if s > self.vars.s_max {
            return format!("horizon:{code}:s={s}");
        }
        let t = TermIndex::new(s.max(1)).expect("s >= 1");
        if self.transcript.passed(code) {
            format!("passed:{code}")
        } else if course.has(CourseFlag::Honors) && !self.prefs.honors {
            format!("honors:{code}")
        } else if s < self.s_n() {
            format!("past-term:{code}:s={s}")
        } else if self.on(Family::Offering) && !course.is_offered(t) {
            format!("eq6:offering:{code}:s={s}")
        } else if self.on(Family::SummersOff) && self.prefs.summers_off && t.season().is_summer() {
            format!("eq14:summers-off:s={s}")
        } else {
            format!("eq13:window:{code}")
        }
    }

    /// Pins and desired courses that no open term can satisfy are reported
    /// here instead of leaving the solver to discover them.
    fn check_selections(&self) -> Result<(), BuildError> {
        if self.on(Family::Pins) {
            for (code, term) in &self.prefs.pins {
                let i = self.idx(code);
                let s = term.get();
                if s > self.vars.s_max || !self.open[i][s as usize] {
                    let reason = self.closed_reason(i, s);
                    return Err(BuildError::InfeasibleByConstruction {
                        message: format!("{code} cannot be taken in {}: {reason}", self.catalog.calendar().token(*term)),
                        tags: vec![format!("eq13:pin:{code}:s={s}"), reason],
                    });
                }
            }
        }
        let windowed = self.prefs.windows.keys().filter(|_| self.on(Family::Pins) || self.on(Family::Desired));
        let desired = self.prefs.desired.iter().filter(|_| self.on(Family::Desired));
        for code in desired.chain(windowed) {
            let i = self.idx(code);
            if self.transcript.passed(code) {
                if self.prefs.windows.contains_key(code) && self.on(Family::Pins) {
                    return Err(BuildError::InfeasibleByConstruction {
                        message: format!("{code} is already passed"),
                        tags: vec![format!("eq13:window:{code}"), format!("passed:{code}")],
                    });
                }
                continue;
            }
            if !(1..=self.vars.s_max).any(|s| self.open[i][s as usize]) {
                let mut tags = vec![format!("eq12:desired:{code}")];
                let mut reasons: Vec<String> = (1..=self.vars.s_max).map(|s| self.closed_reason(i, s)).collect();
                reasons.dedup();
                tags.extend(reasons.into_iter().take(8));
                return Err(BuildError::InfeasibleByConstruction {
                    message: format!("{code} has no term in which it can be taken"),
                    tags,
                });
            }
        }
        Ok(())
    }

    /// `Σ_{m ∈ set} Σ_{t=0}^{s-k_s} coef·x_{m,t}`.
    fn completed_by(&self, set: &[usize], s: u32, coef: f64) -> Vec<(f64, VarId)> {
        let last = s - k_of(s);
        let mut terms = Vec::with_capacity(set.len() * (last as usize + 1));
        for &m in set {
            for t in 0..=last {
                terms.push((coef, self.xs(m, t)));
            }
        }
        terms
    }

    fn emit_requisites(&mut self) -> Result<(), BuildError> {
        let cat = self.catalog;
        for (j, course) in cat.courses().iter().enumerate() {
            let families = [
                (Family::Prerequisite, &course.prereq, "prereq"),
                (Family::Corequisite, &course.coreq, "coreq"),
            ];
            for (family, expr, label) in families {
                if !self.on(family) {
                    continue;
                }
                let cnf = dnf_to_cnf(expr);
                for (k, clause) in cnf.clauses().iter().enumerate() {
                    let members: Vec<usize> = clause.iter().map(|c| self.idx(c)).collect();
                    for s in self.planning_terms() {
                        let mut terms = vec![(1.0, self.xs(j, s))];
                        terms.extend(self.completed_by(&members, s, -1.0));
                        if family == Family::Corequisite {
                            terms.extend(members.iter().map(|&m| (-1.0, self.xs(m, s))));
                        }
                        let tag = format!("eq{}:{label}:{}:c{k}:s={s}", family.number(), course.code);
                        self.model.add_constraint(terms, Sense::Le, 0.0, tag)?;
                    }
                }
            }
        }
        Ok(())
    }

    fn emit_levels(&mut self) -> Result<(), BuildError> {
        let l4 = self.catalog.level_set(Level::L4);
        let l5 = self.catalog.level_set(Level::L5);
        let l6 = self.catalog.level_set(Level::L6);
        self.level_gate(Family::Level5Gate, "l5-after-l4", &l5, &l4, 0.25)?;
        self.level_gate(Family::Level6AfterLevel5, "l6-after-l5", &l6, &l5, 0.25)?;
        if !l4.is_empty() {
            let coef = 1.0 / l4.len() as f64;
            self.level_gate(Family::Level6AfterAllLevel4, "l6-after-all-l4", &l6, &l4, coef)?;
        }
        Ok(())
    }

    /// `x_{i,s} <= coef · Σ_{j ∈ below} Σ_{t <= s-k_s} x_{j,t}` for each target.
    fn level_gate(&mut self, family: Family, label: &str, targets: &[usize], below: &[usize], coef: f64) -> Result<(), BuildError> {
        if !self.on(family) {
            return Ok(());
        }
        for &i in targets {
            for s in self.planning_terms() {
                let mut terms = vec![(1.0, self.xs(i, s))];
                terms.extend(self.completed_by(below, s, -coef));
                let tag = format!("eq{}:{label}:{}:s={s}", family.number(), self.code(i));
                self.model.add_constraint(terms, Sense::Le, 0.0, tag)?;
            }
        }
        Ok(())
    }

    fn emit_availability_linking(&mut self) -> Result<(), BuildError> {
        if !self.on(Family::Linking) {
            return Ok(());
        }
        for i in 0..self.catalog.len() {
            let mut terms: Vec<(f64, VarId)> = (0..=self.vars.s_max).map(|s| (1.0, self.xs(i, s))).collect();
            terms.push((-1.0, self.x(i)));
            let tag = format!("eq8:link:{}", self.code(i));
            self.model.add_constraint(terms, Sense::Eq, 0.0, tag)?;
        }
        Ok(())
    }

    fn emit_credits_groups(&mut self) -> Result<(), BuildError> {
        let cat = self.catalog;
        let cal = cat.calendar();
        let credits = |i: usize| f64::from(cat.courses()[i].credits);
        let n = cat.len();
        if self.on(Family::TotalCredits) {
            let terms: Vec<_> = (0..n).map(|i| (credits(i), self.x(i))).collect();
            self.model
                .add_constraint(terms, Sense::Ge, f64::from(cal.total_credits), "eq7:total-credits")?;
        }
        if self.on(Family::LiberalCredits) {
            let terms: Vec<_> = cat
                .with_flag(CourseFlag::LiberalEducation)
                .into_iter()
                .map(|i| (credits(i), self.x(i)))
                .collect();
            self.model
                .add_constraint(terms, Sense::Ge, f64::from(cal.liberal_credits), "eq9:liberal-credits")?;
        }
        if self.on(Family::TermCredits) {
            let cap = f64::from(self.vars.credit_cap);
            for s in self.planning_terms() {
                let terms: Vec<_> = (0..n).map(|i| (credits(i), self.xs(i, s))).collect();
                self.model.add_constraint(terms, Sense::Le, cap, format!("eq10:term-credits:s={s}"))?;
            }
        }
        if self.on(Family::Groups) {
            let groups: Vec<_> = cat.active_groups(self.prefs.concentration.as_deref()).collect();
            for g in groups {
                debug_assert_eq!(g.kind, GroupKind::Regular);
                let members: Vec<usize> = g.members.iter().map(|m| self.idx(m)).collect();
                let r = f64::from(g.count);
                if g.per_term {
                    for s in self.planning_terms() {
                        let terms: Vec<_> = members.iter().map(|&i| (1.0, self.xs(i, s))).collect();
                        self.model.add_constraint(terms, Sense::Le, r, format!("eq11:group:{}:s={s}", g.name))?;
                    }
                } else {
                    let sense = match g.mode {
                        GroupMode::AtLeast => Sense::Ge,
                        GroupMode::Exact => Sense::Eq,
                    };
                    let terms: Vec<_> = members.iter().map(|&i| (1.0, self.x(i))).collect();
                    self.model.add_constraint(terms, sense, r, format!("eq11:group:{}", g.name))?;
                }
            }
        }
        Ok(())
    }

    fn emit_selections(&mut self) -> Result<(), BuildError> {
        if self.on(Family::Desired) {
            let prefs = self.prefs;
            for code in &prefs.desired {
                let i = self.idx(code);
                self.model.add_constraint([(1.0, self.x(i))], Sense::Eq, 1.0, format!("eq12:desired:{code}"))?;
            }
            for code in prefs.windows.keys() {
                let i = self.idx(code);
                self.model.add_constraint([(1.0, self.x(i))], Sense::Eq, 1.0, format!("eq12:window:{code}"))?;
            }
        }
        if self.on(Family::Pins) {
            for (code, term) in &self.prefs.pins {
                let i = self.idx(code);
                let s = term.get();
                self.model
                    .add_constraint([(1.0, self.xs(i, s))], Sense::Eq, 1.0, format!("eq13:pin:{code}:s={s}"))?;
            }
        }
        Ok(())
    }

    fn emit_softorder(&mut self) -> Result<(), BuildError> {
        if !self.on(Family::SoftOrder) {
            return Ok(());
        }
        for g in self.catalog.groups() {
            let Some((before, after)) = g.soft_order_pair() else {
                continue;
            };
            let (i, j) = (self.idx(before), self.idx(after));
            for s in self.planning_terms() {
                let mut terms = vec![(1.0, self.xs(j, s))];
                terms.extend(self.completed_by(&[i], s, -1.0));
                terms.push((1.0, self.x(i)));
                let tag = format!("eq15:softorder:{}:s={s}", g.name);
                self.model.add_constraint(terms, Sense::Le, 1.0, tag)?;
            }
        }
        Ok(())
    }

    fn emit_caps(&mut self) -> Result<(), BuildError> {
        let n = self.catalog.len();
        if let (Some(t_mx), true) = (self.prefs.max_per_term, self.on(Family::CoursesPerTerm)) {
            for s in self.planning_terms() {
                let terms: Vec<_> = (0..n).map(|i| (1.0, self.xs(i, s))).collect();
                self.model
                    .add_constraint(terms, Sense::Le, f64::from(t_mx), format!("eq16:courses-per-term:s={s}"))?;
            }
        }
        if let (Some(theta_mx), true) = (self.prefs.thesis_max, self.on(Family::Thesis)) {
            // with x_θ,s = 1 the other courses are capped at θ_mx - 1,
            // otherwise at M, the most courses any term can hold
            let big_m = f64::from(self.vars.credit_cap);
            for theta in self.catalog.with_flag(CourseFlag::Thesis) {
                for s in self.planning_terms() {
                    let mut terms: Vec<_> = (0..n).filter(|&i| i != theta).map(|i| (1.0, self.xs(i, s))).collect();
                    terms.push((big_m - f64::from(theta_mx) + 1.0, self.xs(theta, s)));
                    let tag = format!("eq17:thesis:{}:s={s}", self.code(theta));
                    self.model.add_constraint(terms, Sense::Le, big_m, tag)?;
                }
            }
        }
        Ok(())
    }

    fn emit_objective(&mut self) -> Result<(), BuildError> {
        let cat = self.catalog;
        let n = cat.len();
        let s_max = self.vars.s_max;
        let (d, d_l, g_e) = (self.vars.completion, self.vars.balance, self.vars.grade_mass);
        if self.on(Family::Completion) {
            for i in 0..n {
                let mut terms: Vec<_> = (1..=s_max).map(|s| (f64::from(s), self.xs(i, s))).collect();
                terms.push((-1.0, d));
                self.model
                    .add_constraint(terms, Sense::Le, 0.0, format!("eq18:completion:{}", self.code(i)))?;
            }
        }
        for (family, sign) in [(Family::BalanceUp, 1.0), (Family::BalanceDown, -1.0)] {
            if !self.on(family) {
                continue;
            }
            for s in 1..=s_max {
                for s2 in s + 1..=s_max {
                    let mut terms = Vec::with_capacity(2 * n + 1);
                    for (i, c) in cat.courses().iter().enumerate() {
                        terms.push((sign * c.difficulty, self.xs(i, s)));
                        terms.push((-sign * c.difficulty, self.xs(i, s2)));
                    }
                    terms.push((-1.0, d_l));
                    let tag = format!("eq{}:balance:s={s}:t={s2}", family.number());
                    self.model.add_constraint(terms, Sense::Le, 0.0, tag)?;
                }
            }
        }
        let eligible = self.vars.eligible.clone();
        if eligible.is_empty() {
            self.model.fix(g_e, 0.0)?;
        } else {
            if self.on(Family::GradeMass) {
                let mut terms: Vec<_> = eligible.iter().map(|&i| (-self.grades[i], self.x(i))).collect();
                terms.push((1.0, g_e));
                self.model.add_constraint(terms, Sense::Le, 0.0, "eq21:grade-mass")?;
            }
            if self.on(Family::GradeCredits) {
                let terms: Vec<_> = eligible
                    .iter()
                    .map(|&i| (f64::from(cat.courses()[i].credits), self.x(i)))
                    .collect();
                let rem = f64::from(self.vars.credits_remaining);
                self.model.add_constraint(terms, Sense::Le, rem, "eq22:grade-credits")?;
            }
        }
        let (b_g, b_d, b_dl) = self.prefs.objective.weights();
        self.model.set_objective([(b_g, g_e), (b_d, d), (b_dl, d_l)])?;
        Ok(())
    }
}
