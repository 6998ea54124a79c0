import { HttpReviewApi } from "./api.js";
import { App } from "./app.js";
import { Player } from "./player.js";
import { QueueState } from "./state.js";

const api = new HttpReviewApi("");
const state = new QueueState(api);
const player = new Player(new Audio(), state, (id) => api.audioUrl(id));

const root = document.getElementById("app");
if (!root) throw new Error("missing #app mount point");

const app = new App(root, state, player);
void app.start();
