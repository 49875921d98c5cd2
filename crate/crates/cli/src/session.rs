//! Games between a client and the engine, held in memory.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, OnceLock, RwLock};

use chomp_core::symmetry::{johnson_involution, kneser_halving_chain, multipartite_pairing};
use chomp_core::{
    Complex, ComplexJson, EngineConfig, Error, Face, FaceTable, FamilySpec, GameState, MirrorStrategy, Move, Solver,
    VertexId,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Player {
    Human,
    Engine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ongoing,
    HumanLost,
    EngineLost,
}

impl Status {
    pub fn is_terminal(self) -> bool {
        self != Status::Ongoing
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum EnginePolicy {
    #[default]
    Perfect,
    MirrorWhenAvailable,
}

/// How the engine chose a reply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReplySource {
    Engine,
    Mirror,
    /// The budget ran out; the first legal move was played instead.
    Fallback,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub player: Player,
    pub face: Vec<VertexId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineReply {
    pub face: Vec<VertexId>,
    pub perfect: bool,
    pub via: ReplySource,
}

/// Where a session starts: a family spec or an explicit complex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Initial {
    Spec(String),
    Complex(ComplexJson),
}

impl Initial {
    fn key(&self) -> String {
        match self {
            Initial::Spec(s) => format!("spec:{s}"),
            Initial::Complex(c) => format!("complex:{}", serde_json::to_string(c).expect("plain data")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateView {
    pub vertices: Vec<String>,
    pub faces: Vec<Vec<VertexId>>,
}

impl StateView {
    pub fn of(state: &GameState) -> Self {
        StateView {
            vertices: (0..state.table().vertex_count() as VertexId).map(|v| state.label(v)).collect(),
            faces: state.faces().map(|f| f.vertices().to_vec()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionView {
    pub session_id: String,
    pub initial: Initial,
    pub human_first: bool,
    pub engine_policy: EnginePolicy,
    pub state: StateView,
    pub to_move: Player,
    pub history: Vec<HistoryEntry>,
    pub status: Status,
    /// Whether the mirror strategy is still steering the engine.
    pub mirror: bool,
    /// False once any engine reply was not backed by a complete search.
    pub perfect: bool,
}

#[derive(Debug, Clone, Deserialize)]
pub struct CreateRequest {
    #[serde(default)]
    pub spec: Option<String>,
    #[serde(default)]
    pub complex: Option<ComplexJson>,
    #[serde(default = "default_true")]
    pub human_first: bool,
    #[serde(default)]
    pub engine_policy: EnginePolicy,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CreateResponse {
    pub session_id: String,
    pub state: StateView,
    pub engine_move: Option<EngineReply>,
    pub status: Status,
    pub to_move: Player,
    pub mirror: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MoveResponse {
    pub applied: Vec<VertexId>,
    pub engine_reply: Option<EngineReply>,
    pub state: StateView,
    pub status: Status,
}

#[derive(Debug, thiserror::Error)]
pub enum SessionError {
    #[error("no session `{0}`")]
    NotFound(String),
    #[error("{0}")]
    Conflict(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("snapshot: {0}")]
    Snapshot(String),
}

type SessionResult<T> = std::result::Result<T, SessionError>;

/// Everything sessions on the same starting position share: the face table, the
/// solver with its transposition table, and the mirror strategy if one exists.
pub struct Template {
    spec: Option<FamilySpec>,
    start: GameState,
    solver: Solver,
    mirror: OnceLock<Option<MirrorStrategy>>,
    config: EngineConfig,
}

impl Template {
    fn build(initial: &Initial, config: &EngineConfig) -> SessionResult<Self> {
        let (spec, complex): (Option<FamilySpec>, Complex) = match initial {
            Initial::Spec(s) => {
                let spec: FamilySpec = s.parse()?;
                let complex = spec.build()?.complex;
                (Some(spec), complex)
            }
            Initial::Complex(c) => (None, c.load()?.complex),
        };
        let table = Arc::new(FaceTable::new(&complex)?);
        let start = GameState::from_table(table);
        let solver = Solver::for_state(&start, config);
        Ok(Template { spec, start, solver, mirror: OnceLock::new(), config: config.clone() })
    }

    fn mirror(&self) -> Option<&MirrorStrategy> {
        self.mirror
            .get_or_init(|| {
                let maps = mirror_maps(self.spec.as_ref()?)?;
                MirrorStrategy::from_vertex_maps(self.start.table().clone(), &maps, self.config.clone()).ok()
            })
            .as_ref()
    }
}

/// Vertex involution chains known to reduce `spec`, outermost first.
pub fn mirror_maps(spec: &FamilySpec) -> Option<Vec<Vec<VertexId>>> {
    let maps = match spec {
        FamilySpec::Johnson(p) => vec![johnson_involution(p).ok()??.mapping().to_vec()],
        FamilySpec::Kneser(p) => {
            let chain = kneser_halving_chain(p).ok()?;
            let (_, subsets) = p.build().ok()?;
            chain.iter().map(|pi| pi.lift(&subsets).map(|i| i.mapping().to_vec())).collect::<Result<_, _>>().ok()?
        }
        FamilySpec::Multipartite(m) => vec![multipartite_pairing(m).ok()?.mapping().to_vec()],
        FamilySpec::Skeleton { inner, .. } => mirror_maps(inner)?,
        FamilySpec::Complete(_) | FamilySpec::Threshold(_) => return None,
    };
    let moves_something = maps.iter().any(|m| m.iter().enumerate().any(|(v, &w)| v as VertexId != w));
    moves_something.then_some(maps)
}

pub struct Session {
    id: String,
    initial: Initial,
    template: Arc<Template>,
    human_first: bool,
    policy: EnginePolicy,
    state: GameState,
    history: Vec<HistoryEntry>,
    status: Status,
    mirror: bool,
    perfect: bool,
}

impl Session {
    fn new(id: String, initial: Initial, template: Arc<Template>, human_first: bool, policy: EnginePolicy) -> Self {
        let state = template.start.clone();
        let mirror = policy == EnginePolicy::MirrorWhenAvailable && template.mirror().is_some();
        let mut s = Session {
            id,
            initial,
            template,
            human_first,
            policy,
            state,
            history: Vec::new(),
            status: Status::Ongoing,
            mirror,
            perfect: true,
        };
        s.settle();
        s
    }

    /// Rebuilds a session from its history, checking every move.
    pub fn replay(
        id: String,
        initial: Initial,
        template: Arc<Template>,
        human_first: bool,
        policy: EnginePolicy,
        history: &[HistoryEntry],
    ) -> SessionResult<Self> {
        let mut s = Session::new(id, initial, template, human_first, policy);
        for entry in history {
            if s.status.is_terminal() || entry.player != s.to_move() {
                return Err(SessionError::Snapshot(format!("history of `{}` is out of turn", s.id)));
            }
            let face = Face::new(entry.face.iter().copied())?;
            s.state = s.state.apply_move(&Move::new(face))?;
            s.history.push(entry.clone());
            s.settle();
        }
        if s.mirror {
            s.mirror = s.template.mirror().is_some_and(|m| m.check_discipline(&s.state).is_ok());
        }
        Ok(s)
    }

    pub fn to_move(&self) -> Player {
        let first = if self.human_first { Player::Human } else { Player::Engine };
        match (first, self.history.len() % 2) {
            (p, 0) => p,
            (Player::Human, _) => Player::Engine,
            (Player::Engine, _) => Player::Human,
        }
    }

    /// The player to move on an empty board has lost.
    fn settle(&mut self) {
        if self.state.is_terminal() {
            self.status = match self.to_move() {
                Player::Human => Status::HumanLost,
                Player::Engine => Status::EngineLost,
            };
        }
    }

    pub fn state(&self) -> &GameState {
        &self.state
    }

    pub fn view(&self) -> SessionView {
        SessionView {
            session_id: self.id.clone(),
            initial: self.initial.clone(),
            human_first: self.human_first,
            engine_policy: self.policy,
            state: StateView::of(&self.state),
            to_move: self.to_move(),
            history: self.history.clone(),
            status: self.status,
            mirror: self.mirror,
            perfect: self.perfect,
        }
    }

    fn record(&self) -> SnapshotRecord {
        SnapshotRecord {
            id: self.id.clone(),
            initial: Some(self.initial.clone()),
            human_first: self.human_first,
            engine_policy: self.policy,
            history: self.history.clone(),
            deleted: false,
        }
    }

    fn choose_engine_move(&mut self, before: Option<&GameState>) -> SessionResult<(Move, bool, ReplySource)> {
        if self.mirror {
            let strategy = self.template.mirror().expect("mirror flag implies a strategy");
            let reply = match (before, self.history.last()) {
                (Some(before), Some(last)) => {
                    let opponent = Move::new(Face::new(last.face.iter().copied())?);
                    strategy.mirror_reply(before, &opponent)
                }
                _ => strategy.opening(&self.state),
            };
            match reply {
                Ok(Some(m)) => return Ok((m, true, ReplySource::Mirror)),
                Ok(None) | Err(Error::DisciplineBroken(_)) => self.mirror = false,
                Err(e) if e.is_resource_exceeded() => self.mirror = false,
                Err(e) => return Err(e.into()),
            }
        }
        match self.template.solver.best_move(&self.state) {
            Ok(Some(m)) => Ok((m, true, ReplySource::Engine)),
            // A lost seat: every move is as good as any other.
            Ok(None) => Ok((self.state.legal_moves().swap_remove(0), true, ReplySource::Engine)),
            Err(e) if e.is_resource_exceeded() => {
                self.perfect = false;
                Ok((self.state.legal_moves().swap_remove(0), false, ReplySource::Fallback))
            }
            Err(e) => Err(e.into()),
        }
    }

    fn engine_turn(&mut self, before: Option<&GameState>) -> SessionResult<Option<EngineReply>> {
        if self.status.is_terminal() || self.to_move() != Player::Engine {
            return Ok(None);
        }
        let (mv, perfect, via) = self.choose_engine_move(before)?;
        self.state = self.state.apply_move(&mv)?;
        let face = mv.face.vertices().to_vec();
        self.history.push(HistoryEntry { player: Player::Engine, face: face.clone() });
        self.settle();
        Ok(Some(EngineReply { face, perfect, via }))
    }

    /// Applies a human move and the engine's answer.
    pub fn play(&mut self, face: &[VertexId]) -> SessionResult<MoveResponse> {
        if self.status.is_terminal() {
            return Err(SessionError::Conflict("the game is over".into()));
        }
        let face = Face::new(face.iter().copied())?;
        if !self.state.contains(&face) {
            return Err(SessionError::Conflict(format!("face {face} is not on the board")));
        }
        let before = self.state.clone();
        self.state = self.state.apply_move(&Move::new(face.clone()))?;
        self.history.push(HistoryEntry { player: Player::Human, face: face.vertices().to_vec() });
        self.settle();
        let engine_reply = self.engine_turn(Some(&before))?;
        Ok(MoveResponse {
            applied: face.vertices().to_vec(),
            engine_reply,
            state: StateView::of(&self.state),
            status: self.status,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SnapshotRecord {
    id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    initial: Option<Initial>,
    #[serde(default)]
    human_first: bool,
    #[serde(default)]
    engine_policy: EnginePolicy,
    #[serde(default)]
    history: Vec<HistoryEntry>,
    #[serde(default)]
    deleted: bool,
}

/// Append-only JSON lines; the last record per id wins on reload.
struct Snapshot {
    path: PathBuf,
    file: Mutex<File>,
}

impl Snapshot {
    fn open(path: &Path) -> SessionResult<(Self, Vec<SnapshotRecord>)> {
        let mut records = Vec::new();
        if path.exists() {
            let f = File::open(path).map_err(|e| SessionError::Snapshot(e.to_string()))?;
            for (i, line) in BufReader::new(f).lines().enumerate() {
                let line = line.map_err(|e| SessionError::Snapshot(e.to_string()))?;
                if line.trim().is_empty() {
                    continue;
                }
                let rec: SnapshotRecord = serde_json::from_str(&line)
                    .map_err(|e| SessionError::Snapshot(format!("{}:{}: {e}", path.display(), i + 1)))?;
                records.push(rec);
            }
        }
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| SessionError::Snapshot(e.to_string()))?;
        Ok((Snapshot { path: path.to_path_buf(), file: Mutex::new(file) }, records))
    }

    fn append(&self, rec: &SnapshotRecord) -> SessionResult<()> {
        let mut line = serde_json::to_string(rec).expect("plain data");
        line.push('\n');
        let mut f = self.file.lock().expect("snapshot lock");
        f.write_all(line.as_bytes())
            .and_then(|_| f.flush())
            .map_err(|e| SessionError::Snapshot(format!("{}: {e}", self.path.display())))
    }
}

/// All live sessions plus the shared templates. Requests on one session are
/// serialized by its mutex; different sessions proceed in parallel.
pub struct SessionStore {
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
    templates: Mutex<HashMap<String, Arc<Template>>>,
    config: EngineConfig,
    snapshot: Option<Snapshot>,
}

impl SessionStore {
    pub fn new(config: EngineConfig) -> Self {
        SessionStore { sessions: RwLock::default(), templates: Mutex::default(), config, snapshot: None }
    }

    /// A store persisted to `path`, restoring whatever sessions the file holds.
    pub fn with_snapshot(config: EngineConfig, path: &Path) -> SessionResult<Self> {
        let (snapshot, records) = Snapshot::open(path)?;
        let mut store = SessionStore::new(config);
        let mut latest: Vec<(String, SnapshotRecord)> = Vec::new();
        for rec in records {
            latest.retain(|(id, _)| *id != rec.id);
            latest.push((rec.id.clone(), rec));
        }
        for (id, rec) in latest {
            let Some(initial) = rec.initial.filter(|_| !rec.deleted) else { continue };
            let template = store.template(&initial)?;
            let session =
                Session::replay(id.clone(), initial, template, rec.human_first, rec.engine_policy, &rec.history)?;
            store.sessions.get_mut().expect("fresh lock").insert(id, Arc::new(Mutex::new(session)));
        }
        store.snapshot = Some(snapshot);
        Ok(store)
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    fn template(&self, initial: &Initial) -> SessionResult<Arc<Template>> {
        let key = initial.key();
        if let Some(t) = self.templates.lock().expect("template lock").get(&key) {
            return Ok(t.clone());
        }
        // Built outside the lock; a concurrent duplicate is harmless.
        let t = Arc::new(Template::build(initial, &self.config)?);
        Ok(self.templates.lock().expect("template lock").entry(key).or_insert(t).clone())
    }

    fn persist(&self, session: &Session) -> SessionResult<()> {
        match &self.snapshot {
            Some(s) => s.append(&session.record()),
            None => Ok(()),
        }
    }

    fn session(&self, id: &str) -> SessionResult<Arc<Mutex<Session>>> {
        self.sessions
            .read()
            .expect("session map lock")
            .get(id)
            .cloned()
            .ok_or_else(|| SessionError::NotFound(id.to_string()))
    }

    pub fn create(&self, req: CreateRequest) -> SessionResult<CreateResponse> {
        let initial = match (req.spec, req.complex) {
            (Some(s), None) => Initial::Spec(s),
            (None, Some(c)) => Initial::Complex(c),
            _ => return Err(Error::InvalidParams("give exactly one of `spec` and `complex`".into()).into()),
        };
        let template = self.template(&initial)?;
        let id = format!("{:016x}", rand::random::<u64>());
        let mut session = Session::new(id.clone(), initial, template, req.human_first, req.engine_policy);
        let engine_move = session.engine_turn(None)?;
        self.persist(&session)?;
        let response = CreateResponse {
            session_id: id.clone(),
            state: StateView::of(&session.state),
            engine_move,
            status: session.status,
            to_move: session.to_move(),
            mirror: session.mirror,
        };
        self.sessions.write().expect("session map lock").insert(id, Arc::new(Mutex::new(session)));
        Ok(response)
    }

    pub fn play(&self, id: &str, face: &[VertexId]) -> SessionResult<MoveResponse> {
        let session = self.session(id)?;
        let mut s = session.lock().expect("session lock");
        let response = s.play(face)?;
        self.persist(&s)?;
        Ok(response)
    }

    pub fn get(&self, id: &str) -> SessionResult<SessionView> {
        Ok(self.session(id)?.lock().expect("session lock").view())
    }

    pub fn delete(&self, id: &str) -> SessionResult<()> {
        self.sessions.write().expect("session map lock").remove(id).ok_or_else(|| SessionError::NotFound(id.into()))?;
        if let Some(s) = &self.snapshot {
            s.append(&SnapshotRecord {
                id: id.to_string(),
                initial: None,
                human_first: false,
                engine_policy: EnginePolicy::Perfect,
                history: Vec::new(),
                deleted: true,
            })?;
        }
        Ok(())
    }

    /// Replays a session's history from its initial position, for consistency checks.
    pub fn replayed(&self, id: &str) -> SessionResult<SessionView> {
        let view = self.get(id)?;
        let template = self.template(&view.initial)?;
        let s =
            Session::replay(id.into(), view.initial, template, view.human_first, view.engine_policy, &view.history)?;
        Ok(s.view())
    }

    pub fn len(&self) -> usize {
        self.sessions.read().expect("session map lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
