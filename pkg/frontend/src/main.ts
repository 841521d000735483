import { SessionApi } from "./api.js";
import { SessionController } from "./controller.js";
import { SessionView } from "./view.js";

const DEFAULT_BASE_URL = "http://127.0.0.1:8700";

function params(): URLSearchParams {
  return new URLSearchParams(window.location.search);
}

/** Keep the session id in the URL so a browser refresh reopens it. */
function rememberSession(sessionId: string): void {
  const search = params();
  search.set("session", sessionId);
  window.history.replaceState(null, "", `${window.location.pathname}?${search}`);
}

function mountSession(controller: SessionController, root: HTMLElement): void {
  rememberSession(controller.sessionId);
  new SessionView(controller, root).render();
}

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app element");
  const search = params();
  const api = new SessionApi(search.get("api") ?? DEFAULT_BASE_URL);

  const sessionId = search.get("session");
  if (sessionId) {
    const mode = search.get("mode") === "view" ? "view" : "edit";
    try {
      mountSession(await SessionController.open(api, sessionId, mode), root);
      return;
    } catch (err) {
      const note = document.createElement("p");
      note.className = "error";
      note.textContent = `could not open session ${sessionId}: ${
        err instanceof Error ? err.message : String(err)
      }`;
      root.append(note);
    }
  }

  const form = document.createElement("form");
  form.className = "new-session";
  const topic = document.createElement("input");
  topic.className = "new-topic";
  topic.placeholder = "Type a topic sentence";
  const start = document.createElement("button");
  start.textContent = "Start session";
  form.append(topic, start);
  form.onsubmit = (event) => {
    event.preventDefault();
    void SessionController.create(api, topic.value).then(
      (controller) => {
        form.remove();
        mountSession(controller, root);
      },
      (err: unknown) => {
        let note = form.querySelector<HTMLParagraphElement>(".error");
        if (!note) {
          note = document.createElement("p");
          note.className = "error";
          form.append(note);
        }
        note.textContent = err instanceof Error ? err.message : String(err);
      },
    );
  };
  root.append(form);
}

void boot();
