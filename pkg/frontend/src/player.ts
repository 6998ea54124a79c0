/** Audio playback wrapper that reports playback starts to the state, so
 * the submit gate has a single instrumentation point. */

export interface PlaybackSink {
  markPlaybackStarted(id: string): void;
}

export interface AudioLike {
  src: string;
  currentTime: number;
  play(): Promise<void>;
  pause(): void;
  addEventListener(type: string, listener: () => void): void;
}

export class Player {
  private currentId: string | null = null;

  constructor(
    private readonly audio: AudioLike,
    private readonly sink: PlaybackSink,
    private readonly urlFor: (id: string) => string,
  ) {
    this.audio.addEventListener("play", () => {
      if (this.currentId !== null) {
        this.sink.markPlaybackStarted(this.currentId);
      }
    });
  }

  async play(id: string): Promise<void> {
    if (this.currentId !== id) {
      this.currentId = id;
      this.audio.src = this.urlFor(id);
    }
    this.audio.currentTime = 0;
    await this.audio.play();
  }

  stop(): void {
    this.audio.pause();
  }
}
